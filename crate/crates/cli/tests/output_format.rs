use harvestcli::output::{write_csv_to, COLUMNS};
use harvestcli::scenario::TrajectoryKind;
use harvestcli::*;

fn small_sweep() -> Table {
    let mut s = Scenario::default();
    s.trajectory.kind = TrajectoryKind::Static;
    s.quad.window = 4.0;
    let mut table = run_sweep(&SweepSpec::new(SweepVar::DA, 0.5, 2.0, 3, s)).unwrap();
    table.rows.push(Row::failed("d_A", 9.0, "something, \"quoted\""));
    table
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let table = small_sweep();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    write_csv(&table, &path).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back, table);
    for (a, b) in back.rows.iter().zip(&table.rows) {
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.re_x.map(f64::to_bits), b.re_x.map(f64::to_bits));
    }
}

#[test]
fn json_round_trip() {
    let table = small_sweep();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    write_json(&table, &path).unwrap();
    let back = read_json(&path).unwrap();
    assert_eq!(back.rows, table.rows);
    let a: serde_json::Value = serde_json::from_str(&back.header).unwrap();
    let b: serde_json::Value = serde_json::from_str(&table.header).unwrap();
    assert_eq!(a, b);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let keys: Vec<&str> = doc["rows"][0].as_object().unwrap().keys().map(String::as_str).collect();
    for c in COLUMNS {
        assert!(keys.contains(&c), "missing {c}");
    }
}

#[test]
fn empty_table_is_header_only() {
    let table = Table { header: "{\"sweep\":null}".into(), rows: vec![] };
    let mut buf = Vec::new();
    write_csv_to(&table, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, vec!["# {\"sweep\":null}", &COLUMNS.join(",")]);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    write_csv(&table, &path).unwrap();
    assert_eq!(read_csv(&path).unwrap(), table);
}

#[test]
fn identical_runs_give_identical_bytes() {
    let render = || {
        let mut buf = Vec::new();
        write_csv_to(&small_sweep(), &mut buf).unwrap();
        buf
    };
    assert_eq!(render(), render());
}

#[test]
fn header_records_the_scenario() {
    let table = small_sweep();
    let h: serde_json::Value = serde_json::from_str(&table.header).unwrap();
    assert_eq!(h["sweep"]["variable"], "d_A");
    assert_eq!(h["sweep"]["scenario"]["trajectory"]["kind"], "static");
    assert_eq!(h["regulators"]["epsilon"], 1e-4);
}

#[test]
fn schema_errors_name_the_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let mut cols = COLUMNS.to_vec();
    cols.retain(|c| *c != "abs_X");
    std::fs::write(&path, format!("# {{}}\n{}\n", cols.join(","))).unwrap();
    let err = read_csv(&path).unwrap_err().to_string();
    assert!(err.contains("abs_X") && err.contains("bad.csv"), "{err}");

    std::fs::write(&path, format!("{}\n", COLUMNS.join(","))).unwrap();
    assert!(read_csv(&path).is_err());
    assert!(read_csv(&dir.path().join("missing.csv")).unwrap_err().to_string().contains("missing.csv"));
}
