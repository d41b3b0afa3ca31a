use std::fs;
use std::process::{Command, Output};

use hadamard::table::SeriesTable;

fn hadamard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hadamard")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn dist_line(text: &str) -> f64 {
    text.lines().last().and_then(|l| l.strip_prefix("dist=")).expect("final dist line").parse().unwrap()
}

fn csv_part(text: &str) -> &str {
    let cut = text.rfind("dist=").unwrap_or(text.len());
    &text[..cut]
}

#[test]
fn approx_emits_requested_rows() {
    let o = hadamard(&[
        "approx", "--kind", "integral", "--side", "left", "--alpha", "0.5", "--a", "1", "--b", "10", "--n", "2", "--N",
        "3", "--fn", "ln", "--points", "200",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = SeriesTable::parse_csv(&stdout(&o)).unwrap();
    assert_eq!(table.len(), 200);
    assert_eq!(table.names(), vec!["t", "approx", "bound"]);
    assert_eq!(*table.t().last().unwrap(), 10.0);
}

#[test]
fn validation_errors_exit_two() {
    let o = hadamard(&["approx", "--kind", "integral", "--alpha", "1.0", "--fn", "ln"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha must be non-integer"));

    let o = hadamard(&["approx", "--kind", "integral", "--n", "2", "--N", "2", "--fn", "ln"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("N must be at least n+1"));

    let o = hadamard(&["approx", "--kind", "derivative", "--alpha", "1.5", "--fn", "ln"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hadamard(&["approx", "--kind", "integral", "--fn", "ln", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hadamard(&["approx", "--kind", "integral", "--fn", "ln", "--a", "3", "--b", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hadamard(&["sweep", "--kind", "integral", "--fn", "pow4", "--N-list", ""]);
    assert_eq!(o.status.code(), Some(2));
    let o = hadamard(&["fde", "--t-end", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_three() {
    let dir = tempdir();
    let path = dir.join("short.csv");
    let rows: String =
        (0..20).map(|i| format!("{},{}\n", 1.0 + i as f64 * 0.05, (1.0 + i as f64 * 0.05f64).ln())).collect();
    fs::write(&path, format!("t,x\n{rows}")).unwrap();
    // table covers [1, 1.95] but the interval reaches 3
    let o = hadamard(&["approx", "--kind", "integral", "--b", "3", "--table", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn table_input_tracks_the_builtin() {
    let dir = tempdir();
    let path = dir.join("ln.csv");
    let rows: String = (0..=400)
        .map(|i| {
            let t = 1.0 + i as f64 * 0.0025;
            format!("{t},{}\n", t.ln())
        })
        .collect();
    fs::write(&path, format!("t,x\n{rows}")).unwrap();
    let common = ["--kind", "integral", "--b", "2", "--n", "1", "--N", "4", "--points", "20"];
    let from_table =
        hadamard(&[&["compare"][..], &common, &["--table", path.to_str().unwrap(), "--reference", "quad"]].concat());
    let builtin = hadamard(&[&["compare"][..], &common, &["--fn", "ln"]].concat());
    assert_eq!(builtin.status.code(), Some(0));
    assert_eq!(from_table.status.code(), Some(0), "{}", stderr(&from_table));
    let a = SeriesTable::parse_csv(csv_part(&stdout(&from_table))).unwrap();
    let b = SeriesTable::parse_csv(csv_part(&stdout(&builtin))).unwrap();
    for (x, y) in a.column("approx").unwrap().iter().zip(b.column("approx").unwrap()) {
        assert!((x - y).abs() < 1e-4, "{x} vs {y}");
    }
}

#[test]
fn compare_prints_distance_and_respects_bounds() {
    let o = hadamard(&[
        "compare", "--kind", "integral", "--alpha", "0.5", "--a", "1", "--b", "10", "--n", "2", "--N", "3", "--fn",
        "one",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let table = SeriesTable::parse_csv(csv_part(&text)).unwrap();
    assert_eq!(table.names(), vec!["t", "exact", "approx", "abs_err", "bound"]);
    let d = dist_line(&text);
    assert!(d.is_finite() && d < 1e-10, "{d}");
    let err = table.column("abs_err").unwrap();
    let bound = table.column("bound").unwrap();
    assert!(err.iter().zip(bound).all(|(e, b)| *e <= b + 1e-7));
}

#[test]
fn larger_truncation_order_reduces_distance() {
    let run = |big_n: &str| {
        let o = hadamard(&["compare", "--kind", "integral", "--b", "2", "--n", "2", "--N", big_n, "--fn", "pow9"]);
        assert_eq!(o.status.code(), Some(0));
        dist_line(&stdout(&o))
    };
    assert!(run("6") <= run("3"));
}

#[test]
fn self_compare_is_zero() {
    let o = hadamard(&["compare", "--kind", "integral", "--fn", "pow4", "--b", "2", "--reference", "self"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(dist_line(&stdout(&o)), 0.0);
}

#[test]
fn sweeps() {
    let o =
        hadamard(&["sweep", "--kind", "integral", "--fn", "pow4", "--b", "2", "--n-list", "2", "--N-list", "3,5,10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,N,dist"));
    let dists: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(dists.len(), 3);
    assert!(dists.windows(2).all(|w| w[1] <= w[0]), "{dists:?}");

    let o = hadamard(&["sweep", "--kind", "integral", "--fn", "pow9", "--b", "2", "--n-list", "2,3,4", "--N", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
    assert!(stdout(&o).lines().nth(3).unwrap().starts_with("4,5,"));
}

#[test]
fn fde_output_shapes() {
    let o = hadamard(&["fde"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let table = SeriesTable::parse_csv(csv_part(&text)).unwrap();
    assert_eq!(table.names(), vec!["t", "x_numeric", "x_exact", "abs_err"]);
    assert_eq!(table.len(), 10_001);
    assert!(dist_line(&text) < 1e-4);

    let o = hadamard(&["fde", "--N", "4", "--dump-states", "--steps", "20000"]);
    assert_eq!(o.status.code(), Some(0));
    let table = SeriesTable::parse_csv(csv_part(&stdout(&o))).unwrap();
    assert_eq!(table.names(), vec!["t", "x_numeric", "x_exact", "abs_err", "V_2", "V_3", "V_4"]);
    assert_eq!(table.column("V_3").unwrap()[0], 0.0);
}

#[test]
fn non_finite_integration_exits_five() {
    let o = hadamard(&["fde", "--N", "7", "--steps", "50"]);
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));
}

#[test]
fn metadata_and_output_file() {
    let dir = tempdir();
    let path = dir.join("out.csv");
    let o = hadamard(&[
        "approx",
        "--kind",
        "derivative",
        "--side",
        "right",
        "--fn",
        "pow4",
        "--b",
        "2",
        "--meta",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let table = SeriesTable::parse_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(table.meta("side"), Some("right"));
    assert_eq!(table.meta("function"), Some("pow4"));
    assert_eq!(table.meta("N"), Some("3"));
}

#[test]
fn identical_flags_give_identical_bytes() {
    let args: [&[&str]; 3] = [
        &["approx", "--kind", "integral", "--fn", "pow9", "--b", "2"],
        &["compare", "--kind", "derivative", "--fn", "ln", "--reference", "quad"],
        &["fde", "--N", "3", "--steps", "12000"],
    ];
    for a in args {
        assert_eq!(hadamard(a).stdout, hadamard(a).stdout, "{a:?}");
    }
}

fn tempdir() -> std::path::PathBuf {
    let dir =
        std::env::temp_dir().join(format!("hadamard-cli-{}-{:?}", std::process::id(), std::thread::current().id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}
