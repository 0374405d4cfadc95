//! Output records and their CSV/JSON serialization.
//!
//! Both formats are emitted byte-deterministically: floats are printed with
//! 17 significant digits (round-trip safe), rows keep grid order, lines end
//! with LF.

/// 17-significant-digit float formatting shared by CSV and JSON output.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        // CSV keeps the bare token; JSON must quote non-finite values
        format!("{v}")
    }
}

fn json_f64(v: f64) -> String {
    if v.is_finite() {
        fmt_f64(v)
    } else {
        format!("\"{v}\"")
    }
}

/// Minimal JSON string escaping (the strings we emit are ASCII messages).
pub fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// CSV field quoting for free-text columns (error messages may contain
/// commas or quotes).
pub fn csv_text(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One field of a record: float, text, or empty.
pub enum Field {
    Num(f64),
    Text(String),
    Empty,
}

impl Field {
    fn to_csv(&self) -> String {
        match self {
            Field::Num(v) => fmt_f64(*v),
            Field::Text(s) => csv_text(s),
            Field::Empty => String::new(),
        }
    }

    fn to_json(&self) -> String {
        match self {
            Field::Num(v) => json_f64(*v),
            Field::Text(s) => format!("\"{}\"", json_escape(s)),
            Field::Empty => "null".to_string(),
        }
    }
}

/// A rectangular record table with fixed column names.
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Field::to_csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Full JSON document: `{"meta": {...}, "records": [...]}` with the
    /// config echo supplied as pre-rendered JSON key/value pairs.
    pub fn to_json(&self, config_echo: &[(&str, String)]) -> String {
        let mut out = String::from("{\"meta\":{\"version\":\"");
        out.push_str(env!("CARGO_PKG_VERSION"));
        out.push_str("\",\"schema_version\":1,\"config\":{");
        for (i, (k, v)) in config_echo.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("\"{}\":{}", json_escape(k), v));
        }
        out.push_str("}},\"records\":[");
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('{');
            for (j, (name, field)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("\"{}\":{}", json_escape(name), field.to_json()));
            }
            out.push('}');
        }
        out.push_str("]}");
        out.push('\n');
        out
    }
}
