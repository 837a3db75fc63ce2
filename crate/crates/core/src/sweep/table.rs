//! CSV and JSON rendering of sweep rows.
//!
//! Both formats share column names. Floats are written with 17 significant
//! digits so the text round-trips to the same `f64`. Quantities that do not
//! exist at a point (negativities of an unstable point, say) are left empty
//! in CSV and `null` in JSON.

use std::io::{self, Write};

use serde_json::{Map, Value};

use super::{SweepRow, SweepSpec};

/// Column names in output order.
pub fn columns(spec: &SweepSpec) -> Vec<String> {
    let mut cols: Vec<String> = [
        "index",
        "axis_name",
        "axis_value",
        "stable",
        "max_real_eig_over_omega_m",
    ]
    .map(String::from)
    .to_vec();
    cols.extend(
        spec.bipartitions
            .iter()
            .map(|b| format!("EN_{}", b.label())),
    );
    cols.extend(["G_c_over_omega_m", "G_w1_over_omega_m", "G_w2_over_omega_m"].map(String::from));
    cols
}

fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn csv_fields(spec: &SweepSpec, row: &SweepRow) -> Vec<String> {
    let mut f = vec![
        row.index.to_string(),
        spec.axis.name().to_string(),
        fmt_f64(row.axis_value),
        row.stable.to_string(),
        fmt_f64(row.max_real_eig_over_omega_m),
    ];
    f.extend(row.negativity.iter().map(|e| fmt_opt(*e)));
    f.push(fmt_f64(row.g_c_over_omega_m));
    f.extend(row.g_w_over_omega_m.iter().map(|g| fmt_f64(*g)));
    f
}

pub fn write_csv<W: Write>(mut out: W, spec: &SweepSpec, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{}", columns(spec).join(","))?;
    for row in rows {
        writeln!(out, "{}", csv_fields(spec, row).join(","))?;
    }
    Ok(())
}

pub fn to_csv_string(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, spec, rows).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// One JSON object per row, keyed by [`columns`]. A row that hit a
/// numerical failure also carries an `error` string.
pub fn to_json(spec: &SweepSpec, rows: &[SweepRow]) -> Value {
    let names = columns(spec);
    let en = &names[5..5 + spec.bipartitions.len()];
    let objects = rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            m.insert("index".into(), row.index.into());
            m.insert("axis_name".into(), spec.axis.name().into());
            m.insert("axis_value".into(), num(row.axis_value));
            m.insert("stable".into(), row.stable.into());
            m.insert(
                "max_real_eig_over_omega_m".into(),
                num(row.max_real_eig_over_omega_m),
            );
            for (name, e) in en.iter().zip(&row.negativity) {
                m.insert(name.clone(), e.map_or(Value::Null, num));
            }
            m.insert("G_c_over_omega_m".into(), num(row.g_c_over_omega_m));
            m.insert("G_w1_over_omega_m".into(), num(row.g_w_over_omega_m[0]));
            m.insert("G_w2_over_omega_m".into(), num(row.g_w_over_omega_m[1]));
            if let Some(err) = &row.error {
                m.insert("error".into(), err.clone().into());
            }
            Value::Object(m)
        })
        .collect();
    Value::Array(objects)
}

pub fn write_json<W: Write>(mut out: W, spec: &SweepSpec, rows: &[SweepRow]) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, &to_json(spec, rows))?;
    writeln!(out)
}
