use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Empty,
}

impl From<i128> for Cell {
    fn from(v: i128) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn float_text(v: f64) -> String {
    format!("{:?}", round12(v))
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => float_text(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(small) => Value::from(small),
                Err(_) => Value::from(v.to_string()),
            },
            Cell::Float(v) => {
                serde_json::Number::from_f64(round12(*v)).map_or(Value::Null, Value::Number)
            }
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Table {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .headers
                    .iter()
                    .zip(row)
                    .map(|(h, c)| (h.to_string(), c.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

/// Replaces every float in a JSON tree by its 12-digit rounding.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = n.as_f64().unwrap_or(0.0);
            serde_json::Number::from_f64(round12(f)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_twelve_digits() {
        assert_eq!(float_text(1.0), "1.0");
        assert_eq!(float_text(std::f64::consts::PI), "3.14159265359");
        assert_eq!(float_text(-std::f64::consts::LN_2), "-0.69314718056");
        assert_eq!(float_text(1e7), "10000000.0");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["x", "count", "ratio", "note"]);
        t.push(vec![
            Cell::from(1000u64),
            Cell::from(1000u64),
            Cell::from(1.0),
            Cell::Empty,
        ]);
        t.push(vec![
            Cell::from(10u64),
            Cell::from(-3i128),
            Cell::from(0.5),
            Cell::from("a,b".to_string()),
        ]);
        assert_eq!(
            t.to_csv(),
            "x,count,ratio,note\n1000,1000,1.0,\n10,-3,0.5,\"a,b\"\n"
        );
    }

    #[test]
    fn json_rows() {
        let mut t = Table::new(&["x", "S"]);
        t.push(vec![Cell::from(2.0), Cell::Int(i128::MAX)]);
        let v = t.to_json();
        assert_eq!(v[0]["x"], Value::from(2.0));
        assert_eq!(v[0]["S"], Value::from(i128::MAX.to_string()));
    }
}
